from setuptools import setup

install_requires = [
      "numpy",
      "scipy"
]

extras_require = {
      "docs": ["pdoc3"],
      "tests": ["mpmath"]
}

setup(name="pyfracinv",
      version="0.1",
      description="Variable exponent TV reconstruction for the backward space-time fractional diffusion problem",
      license="MIT",
      packages=["fracinv"],
      python_requires=">=3.7",
      install_requires=install_requires,
      extras_require=extras_require,
      entry_points={
            "console_scripts": ["fracinv=fracinv.cli:main"]
      }
)
