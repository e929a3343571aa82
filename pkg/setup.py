"""Build script for the optional compiled kernel core.

The package works without the extension (a pure-numpy fallback is selected
at import time), so the build is marked optional: if no C toolchain is
available the install still succeeds.
"""
import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "dqclab._kernels",
                ["src/dqclab/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
