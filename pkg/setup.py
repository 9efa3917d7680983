import setuptools

if __name__ == "__main__":
    setuptools.setup(
        name='nonphys',
        version="0.1.0",
        description='Non-physicality measures of Hermiticity-preserving maps: diamond norm, base norm, robustness and simulation cost.',
        url="none",
        license='BSD-3C',
        packages=setuptools.find_packages(exclude=['tests']),
        install_requires=[
            'numpy>=1.17',
            'jax>=0.4',
            'jaxlib>=0.4',
            'scipy>=1.6',
            'h5py>=2.8.0'
        ],
        extras_require={
            'tests': [
                'pytest',
                'pytest-cov',
            ],
        },

        tests_require=[
            'pytest',
            'pytest-cov',
        ],

        entry_points={
            'console_scripts': [
                'nonphys = nonphys.cli:main',
            ],
        },

        classifiers=[
            'Development Status :: 4 - Beta',
            'Intended Audience :: Science/Research',
            'Programming Language :: Python :: 3',
        ],
        zip_safe=True,
    )
