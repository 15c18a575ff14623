from setuptools import setup, find_packages

setup(
    name='pose-orbit',
    version='0.1',
    url='https://github.com/HQJaTu/',
    license='GPLv2',
    author='Jari Turkia',
    author_email='jatu@hqcodeshop.fi',
    description='Projection compatibility checks and SO(2) pose inference with a geometric VAE',
    classifiers=[
        # How mature is this project? Common values are
        #   3 - Alpha
        #   4 - Beta
        #   5 - Production/Stable
        'Development Status :: 3 - Alpha',

        # Indicate who your project is intended for
        'Intended Audience :: Science/Research',

        # Specify the Python versions you support here.
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Programming Language :: Python :: 3.12'
    ],
    python_requires='>=3.8, <4',
    install_requires=[
        'lxml>=4.8.0',
        'numpy>=1.20',
        'scipy>=1.7',
        'matplotlib>=3.3'
    ],
    extras_require={
        'test': [
            'pytest>=7.0',
            'hypothesis>=6.0'
        ]
    },
    scripts=[
        'cli-utils/poseorbit-cmd.py'
    ],
    package_data={
        'poseorbit': ['xml/checkpoint.xsd']
    },
    packages=find_packages(exclude=['tests'])
)
