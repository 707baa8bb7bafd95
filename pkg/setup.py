"""Build script: compiles the optional word-kernel extension when possible.

The package is fully functional without the extension; any build failure
degrades to the pure-Python backend with a warning.
"""

import os
import warnings

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Skip the extension (instead of failing the install) on build errors."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001 - any toolchain failure is fine
            warnings.warn(f"skipping compiled extension: {exc}", stacklevel=1)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            warnings.warn(f"skipping {ext.name}: {exc}", stacklevel=1)


def extensions():
    pyx = os.path.join("src", "crossedprod", "_core", "_speedups.pyx")
    if not os.path.exists(pyx):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    from setuptools.extension import Extension

    return cythonize(
        [Extension("crossedprod._core._speedups", [pyx])],
        language_level=3,
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
