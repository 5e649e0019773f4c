"""Build script: compiles the optional Cython token scanner.

The package is fully functional without the extension; fablink.step falls
back to the pure-Python scanner when the compiled module is absent.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/fablink/step/_scan_c.pyx",
        language_level="3",
    )
except Exception as exc:  # pragma: no cover - build-env dependent
    print(f"fablink: building without compiled scanner ({exc})")

setup(ext_modules=ext_modules)
