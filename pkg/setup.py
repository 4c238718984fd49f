from setuptools import find_packages, setup

setup(name='unida-tools',
      version='0.1.0',
      description='Universal domain adaptation by classifier paradox on '
      'desk-scale synthetic benchmarks',
      packages=find_packages(exclude=('tests', 'tests.*')),
      python_requires='>=3.8',
      install_requires=[
          'numpy',
          'pandas',
          'pyyaml',
          'scikit-learn',
          'scipy',
          'tqdm',
      ],
      entry_points={'console_scripts': ['unida = unida.cli:main']})
