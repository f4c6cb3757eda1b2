"""Build script: compiles the Cython hot-loop kernel when a toolchain is
available, otherwise installs pure-Python only (the package falls back to the
numpy loop at import time)."""
import numpy
from setuptools import setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/heavyball/_kernels/_fastloop.pyx",
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(
    ext_modules=ext_modules,
    include_dirs=[numpy.get_include()],
)
