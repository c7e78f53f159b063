from setuptools import setup, find_packages
from codecs import open
from os import path

here = path.abspath(path.dirname(__file__))

# Get the long description from the README file
with open(path.join(here, 'README.md'), encoding='utf-8') as f:
    long_description = f.read()

setup(
    name='robustmc',
    version='0.1.0',

    description='Robust matrix completion by alternating least squares.',
    long_description=long_description,
    long_description_content_type='text/markdown',

    license='MIT',
    classifiers=[
        'Development Status :: 3 - Alpha',

        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Mathematics',

        'License :: OSI Approved :: MIT License',

        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.7',
        'Programming Language :: Python :: 3.8',
    ],
    keywords='matrix completion robust pca low-rank sparse',
    packages=find_packages(exclude=['contrib', 'docs', 'tests']),
    python_requires='>=3.7',
    install_requires=[
        'numpy>=1.17',
        'scikit-learn>=0.18.1',
        'scipy'],
    entry_points={
        'console_scripts': ['robustmc=robustmc.cli:main'],
    },
    setup_requires=['pytest-runner'],
    tests_require=['pytest'],
)
