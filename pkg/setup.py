from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

# The compiled kernels are an optional speedup; the package falls back to the
# pure-Python implementation when the extension is unavailable.
extensions = [
    Extension(
        "quadpref.prefloss._core",
        ["src/quadpref/prefloss/_core.pyx"],
        optional=True,
    )
]

setup(
    ext_modules=cythonize(
        extensions, compiler_directives={"language_level": "3"}
    )
    if cythonize
    else []
)
