"""Build hook: compile the Cython kernels when Cython and a compiler are present."""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("FASTCONV_NO_EXT") != "1":
    try:
        import numpy  # noqa: F401
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("fastconv._kernels", ["src/fastconv/_kernels.pyx"], extra_compile_args=["-O3"])],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
