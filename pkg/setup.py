# Cython extension build; the package falls back to the pure-Python kernels
# when the compiled module is unavailable.
from Cython.Build import cythonize
from setuptools import Extension, setup

# -ffp-contract=off keeps the compiled kernels bit-identical to the
# pure-Python twins (no FMA contraction of a*b+c).
setup(
    ext_modules=cythonize(
        [
            Extension(
                "koopesc._kernels",
                sources=["src/koopesc/_kernels.pyx"],
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        language_level=3,
    )
)
