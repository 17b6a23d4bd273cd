import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("BELLSWAP_NO_EXT"):
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "bellswap._trial_core",
                    ["src/bellswap/_trial_core.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        # No Cython toolchain: the pure-Python kernel is used at runtime.
        ext_modules = []

setup(ext_modules=ext_modules)
