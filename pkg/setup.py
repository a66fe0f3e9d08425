from setuptools import find_packages, setup
from typing import List


def parse_requirements(file_name: str) -> List[str]:
    requirements = []
    with open(file_name) as f:
        for require in f:
            require = require.strip()
            if require.startswith('# tests'):
                break
            if require and not require.startswith('#'):
                requirements.append(require)
    return requirements


def readme():
    with open('README.md', encoding='utf-8') as f:
        content = f.read()
    return content


version_file = 'wasserlab/version.py'


def get_version():
    with open(version_file, 'r', encoding='utf-8') as f:
        exec(compile(f.read(), version_file, 'exec'))
    return locals()['__version__']


setup(
    name='wasserlab',
    version=get_version(),
    description='Exact discrete Wasserstein distances and rigidity experiments over normed spaces',
    license='Apache License 2.0',
    packages=find_packages(exclude=['*test*']),
    include_package_data=True,
    python_requires='>=3.9',
    install_requires=parse_requirements('requirements.txt'),
    extras_require={'test': ['pytest', 'hypothesis']},
    entry_points={'console_scripts': ['wasserlab=wasserlab.cli:main']},
    long_description=readme(),
    long_description_content_type='text/markdown',
)
