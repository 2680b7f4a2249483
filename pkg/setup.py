from setuptools import find_namespace_packages, setup

setup(
    name="tag_distill",
    package_dir={'': 'src'},
    packages=find_namespace_packages(where='src'),
    py_modules=["main", "utils", "errors"],
    python_requires=">=3.9",
    install_requires=[
        "numpy",
        "scikit-learn",
        "torch",
        "transformers",
        "openai>=1.0",
        "matplotlib",
    ],
)
