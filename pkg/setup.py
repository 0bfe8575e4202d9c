import os

from setuptools import setup

# The compiled kernels are optional: set SPHLIS_NO_EXT=1 (or build without
# Cython) to get a pure-numpy install.  sphlis._kernels falls back at import.
ext_modules = []
if not os.environ.get("SPHLIS_NO_EXT"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "sphlis._kernels._core",
                    ["src/sphlis/_kernels/_core.pyx"],
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
