from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension(
            "brjunokit._kernels",
            ["src/brjunokit/_kernels.pyx"],
            include_dirs=[numpy.get_include()],
            # keep a*b+c as two rounded operations so error bounds stay valid
            extra_compile_args=["-O2", "-ffp-contract=off"],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        )],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
