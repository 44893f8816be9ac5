"""Build the optional compiled kernels; the package works without them."""
from setuptools import setup

try:
    from Cython.Build import cythonize
    ext_modules = cythonize(["src/si3/_kernels.pyx"], quiet=True)
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
