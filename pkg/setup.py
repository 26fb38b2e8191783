#
# RieszLab
#
# Copyright 2024 Seoul National University
#
# Permission is hereby granted, free of charge, to any person obtaining
# a copy of this software and associated documentation files (the
# “Software”), to deal in the Software without restriction, including
# without limitation the rights to use, copy, modify, merge, publish,
# distribute, sublicense, and/or sell copies of the Software, and to
# permit persons to whom the Software is furnished to do so, subject to
# the following conditions:
#
# The above copyright notice and this permission notice shall be included
# in all copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED “AS IS”, WITHOUT WARRANTY OF ANY KIND,
# EXPRESS OR IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF
# MERCHANTABILITY, FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN
# NO EVENT SHALL THE AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM,
# DAMAGES OR OTHER LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR
# OTHERWISE, ARISING FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE OR
# THE USE OR OTHER DEALINGS IN THE SOFTWARE.
#

from setuptools import setup

setup(
    name='rieszlab',
    version='0.3',
    description='Experiments on Two-Weight Inequalities for Riesz Transforms',
    long_description=open('README.md').read(),
    long_description_content_type='text/markdown',
    keywords=[
        'harmonic analysis',
        'Riesz transforms',
        'two-weight inequalities',
        'dyadic models',
    ],
    license='MIT',
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Environment :: Console',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Operating System :: POSIX',
        'Programming Language :: Python :: 3 :: Only',
        'Topic :: Scientific/Engineering :: Mathematics',
    ],
    packages=['rieszlab', 'rieszlab.experiments'],
    package_data={'rieszlab': ['report_template/*']},
    data_files=[('share/rieszlab/configs',
        ['configs/cascade-study.json', 'configs/nazarov-pair.json',
         'configs/transplant.json', 'configs/instability-headline.json',
         'configs/pushforward-study.json', 'configs/convergence-study.json'])],
    entry_points={
        'console_scripts': [
            'rieszlab = rieszlab.__main__:run_rieszlab',
        ],
    },
    install_requires=[
        'numpy >= 1.22',
        'scipy >= 1.8',
        'pandas >= 2.0',
        'tqdm >= 4.0',
        'tabulate >= 0.9',
        'Jinja2 >= 3.1',
        'pylru >= 1.2',
    ],
    extras_require={
        'test': ['pytest >= 7.0'],
    },
)
