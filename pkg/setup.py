"""Build script: compiles the optional fast kernel.

The package is pure Python plus one accelerator module, imprand._core.
If Cython or a C compiler is missing, the build degrades gracefully and
the numpy fallback (imprand._core_py) is selected at import time.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Never fail the install because the accelerator would not compile."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - toolchain dependent
            warnings.warn(f"skipping compiled kernel ({exc}); using numpy fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover - toolchain dependent
            warnings.warn(f"skipping {ext.name} ({exc}); using numpy fallback")


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:  # pragma: no cover - build env without Cython
        return []
    return cythonize(
        [
            Extension(
                "imprand._core",
                ["src/imprand/_core.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
