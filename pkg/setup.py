"""Builds the optional compiled scanner; the package works without it."""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize
except ImportError:
    pass
else:
    ext_modules = cythonize(
        [Extension("cyclomahler._scan", ["src/cyclomahler/_scan.pyx"])],
        compiler_directives={"language_level": "3"},
        quiet=True,
    )
    for ext in ext_modules:
        ext.optional = True  # a failed C build falls back to the pure-Python scanner

setup(ext_modules=ext_modules)
