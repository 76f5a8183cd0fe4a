#!/usr/bin/env python

"""
#version:
readme.rst
qcheshire/__init__.py

#test
rm -rf test/__pycache__
py.test -vv --doctest-modules --cov=qcheshire --cov-report term-missing
#or
tox

#install
pip uninstall qcheshire
pip install numpy scipy pyyaml pint svgwrite
pip install -e .
#or
python setup.py bdist_wheel
pip install dist/qcheshire-X.Y.Z-py3-none-any.whl
"""

from setuptools import setup
from os.path import abspath,dirname,join
import os
import sys
import re
import ast
import codecs

here = abspath(dirname(__file__))
os.chdir(here)

_version_re = re.compile(r'__version__\s*=\s*(.*)')
with open(os.path.join(here, 'qcheshire','__init__.py'), 'rb') as f:
    version = str(ast.literal_eval(_version_re.search(
        f.read().decode('utf-8')).group(1)))

def long_description():
      def read(fname, separator='\n\n"""',sec=[1]):
          res = []
          with open(join(here, fname),
                    encoding='utf-8') as f:
              r = f.read().split(separator)
              for s in sec:
                    res.append(r[s])
          return '\n'.join(res)
      return '\n'.join([
          open('readme.rst', encoding='utf-8').read(),
          read('qcheshire/cli.py'),
          read('qcheshire/config.py'),
          ])


if __name__ == '__main__':
    if len(sys.argv) > 1 and sys.argv[1] == '--print':
        try:
            sys.stdout = codecs.getwriter("utf-8")(sys.stdout.detach())
        except:
            pass
        print(long_description())
    else:
        setup(name='qcheshire',
      version=version,
      description='qcheshire - simulate and analyse a single-photon quantum Cheshire cat',
      license='MIT',
      keywords=['weak values', 'quantum optics', 'interferometry'],
      classifiers=[
          'Development Status :: 4 - Beta',
          'Environment :: Console',
          'License :: OSI Approved :: MIT License',
          'Natural Language :: English',
          'Operating System :: OS Independent',
          'Programming Language :: Python :: 3',
          'Intended Audience :: Science/Research',
          'Topic :: Scientific/Engineering :: Physics',
          ],
      python_requires='>=3.7',
      install_requires=['numpy', 'scipy', 'pint>=0.14', 'pyyaml', 'svgwrite'],
      extras_require={'develop': ['pytest', 'pytest-coverage', 'virtualenv']},
      long_description=long_description(),
      long_description_content_type='text/x-rst',
      packages=['qcheshire'],
      zip_safe=False,
      tests_require=['pytest', 'pytest-coverage'],
      entry_points={
          'console_scripts': [
              'qcheshire=qcheshire.cli:main',
              ]
          },
      )
