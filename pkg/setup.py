import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    # -ffp-contract=off keeps the C arithmetic bit-identical to the numpy
    # fallback path (no FMA contraction), which test_kernels relies on.
    ext_modules = cythonize(
        [
            Extension(
                "rydberg_ofdm.kernels._kernels",
                ["src/rydberg_ofdm/kernels/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3", "-ffp-contract=off"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
