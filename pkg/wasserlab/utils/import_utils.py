import importlib
import os
from itertools import chain
from types import ModuleType
from typing import Any, Dict, List


class _LazyModule(ModuleType):
    """Package module that imports a submodule only when one of its names is used.

    Keeps `import wasserlab` cheap: scipy is loaded by the first access to
    a name from a module that needs it.
    """

    def __init__(self, name: str, module_file: str, import_structure: Dict[str, List[str]],
                 module_spec=None):
        super().__init__(name)
        self._import_structure = import_structure
        self._modules = set(import_structure)
        self._name_to_module = {
            attr: module for module, attrs in import_structure.items() for attr in attrs
        }
        self.__all__ = list(import_structure) + list(chain(*import_structure.values()))
        self.__file__ = module_file
        self.__spec__ = module_spec
        self.__path__ = [os.path.dirname(module_file)]

    def __dir__(self):
        result = super().__dir__()
        return result + [attr for attr in self.__all__ if attr not in result]

    def __getattr__(self, name: str) -> Any:
        if name in self._modules:
            value = self._load(name)
        elif name in self._name_to_module:
            value = getattr(self._load(self._name_to_module[name]), name)
        else:
            raise AttributeError(f'module {self.__name__} has no attribute {name}')
        setattr(self, name, value)
        return value

    def _load(self, module_name: str):
        return importlib.import_module('.' + module_name, self.__name__)

    def __reduce__(self):
        return (self.__class__, (self.__name__, self.__file__, self._import_structure))
