"""Build script with an optional compiled kernel extension.

The package is fully functional without the extension (a NumPy fallback is
selected at import time); building it just makes the 2^n-term permanent and
Hafnian walks much faster. Any build failure degrades to the pure install.
"""

import warnings

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "qrslab._kernels._fast",
                sources=["src/qrslab/_kernels/_fast.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - depends on build environment
    warnings.warn(f"compiled kernels disabled ({exc}); installing pure-Python fallback")

setup(ext_modules=ext_modules)
