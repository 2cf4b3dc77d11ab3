try:
    from setuptools import setup
except ImportError:
    from distutils.core import setup

setup(
    name='FHMpy',
    version='0.1',
    packages=['FHMpy'],
    package_data={'FHMpy': ['data/*']},
    url='',
    license='',
    author='',
    author_email='',
    install_requires=[
        'numpy',
        'pandas',
        'scipy',
    ],
    extras_require={
        'test': ['pytest'],
    },
    entry_points={
        'console_scripts': ['fhmpy=FHMpy.cli:main'],
    },
    description='Exact core analysis of housing markets with fractional endowments'
)
