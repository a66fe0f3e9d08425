"""File formats: measures, subspaces and norms in JSON, results in JSON or CSV."""
import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence, Union

import numpy as np

from ..exceptions import InputError
from ..measures import DiscreteMeasure, measure_from_json
from ..norms import NormSpec, norm_from_json
from ..projections import AffineSubspace

PathLike = Union[str, Path]


def read_json(path: PathLike) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding='utf-8'))
    except OSError as e:
        raise InputError(f'cannot read {path}: {e}') from e
    except json.JSONDecodeError as e:
        raise InputError(f'{path} is not valid JSON: {e}') from e


def load_measure(path: PathLike) -> DiscreteMeasure:
    return measure_from_json(read_json(path))


def load_subspace(path: PathLike) -> AffineSubspace:
    return AffineSubspace.from_json(read_json(path))


def parse_norm(text: str) -> NormSpec:
    """Inline JSON, a bare kind name, or @path to a JSON file."""
    text = text.strip()
    if text.startswith('@'):
        return norm_from_json(read_json(text[1:]))
    if not text.startswith('{'):
        return norm_from_json({'kind': text})
    return norm_from_json(text)


def _plain(obj: Any) -> Any:
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def _format_float(x: float) -> str:
    if math.isnan(x):
        return 'NaN'
    if math.isinf(x):
        return 'Infinity' if x > 0 else '-Infinity'
    text = format(x, '.17g')
    if not any(c in text for c in '.en'):
        text += '.0'
    return text


def _encode(obj: Any, level: int, indent: int) -> str:
    pad = ' ' * (indent * (level + 1))
    end = ' ' * (indent * level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return _format_float(obj)
    if isinstance(obj, (int, str)):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return '{}'
        items = [f'{pad}{json.dumps(k)}: {_encode(obj[k], level + 1, indent)}' for k in sorted(obj)]
        return '{\n' + ',\n'.join(items) + '\n' + end + '}'
    if isinstance(obj, list):
        if not obj:
            return '[]'
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return '[' + ', '.join(_encode(v, level, indent) for v in obj) + ']'
        items = [pad + _encode(v, level + 1, indent) for v in obj]
        return '[\n' + ',\n'.join(items) + '\n' + end + ']'
    raise InputError(f'cannot serialise {type(obj).__name__}')


def dumps(obj: Any, indent: int = 2) -> str:
    """Deterministic JSON: sorted keys, floats with 17 significant digits."""
    return _encode(_plain(obj), 0, indent) + '\n'


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([_format_float(v) if isinstance(v, float) else v for v in _plain(list(row))])
    return buf.getvalue()


def emit(text: str, out: Optional[PathLike] = None, stream=None):
    """Write to `out` when given, else to `stream`."""
    if out is None:
        stream.write(text)
        return
    try:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, encoding='utf-8')
    except OSError as e:
        raise InputError(f'cannot write {out}: {e}') from e
