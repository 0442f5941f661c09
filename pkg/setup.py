try:
    from setuptools import setup, find_packages
except ImportError:
    from distutils.core import setup

setup(name='treelasso',
      use_scm_version=True,
      setup_requires=['setuptools_scm'],
      description="Tree-guided group lasso for multiple-output regression",
      long_description="""
      Treelasso fits sparse multiple-output linear regressions whose
      penalty follows a hierarchical clustering of the outputs, learns such
      trees from data and reproduces simulated support-recovery studies.
      """,
      license='MIT',
      packages=find_packages(exclude=['tests']),
      install_requires=['numpy', 'scipy', 'sympy', 'networkx', 'frozendict',
                        'scikit-learn', 'joblib', 'pandas', 'pyyaml'],
      extras_require={'test': ['pytest', 'hypothesis']},
      entry_points={'console_scripts': [
          'treelasso = treelasso.cli.main:run']})
