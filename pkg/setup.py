"""Build script for the optional compiled kernel extension.

The package works without the extension; a pure Python twin of every
kernel is selected at import time when the compiled module is missing.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    extensions = cythonize(
        [
            Extension(
                "swarmguard._kernels._speed",
                ["src/swarmguard/_kernels/_speed.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
        compiler_directives={"boundscheck": False, "wraparound": False},
    )
else:
    extensions = []

setup(ext_modules=extensions)
