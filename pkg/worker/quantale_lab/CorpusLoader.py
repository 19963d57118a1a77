import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from .FiniteFrame import FiniteFrame
from .FiniteQuantale import FiniteQuantale, QuantaleHom
from .LabCommon import CorpusFormatError, QuantaleLabError, lab_setting
from .MaxSpectrum import Subspace, span
from .StarAlgebra import Algebra
from .SupLattice import SupLattice, endo_quantale, transitive_closure

logger = logging.getLogger(__name__)

Source = Union[str, Path, Dict[str, Any]]


def corpus_dir() -> Path:
    return Path(lab_setting('QLAB_CORPUS_DIR'))


def _read(source: Source, kind: str) -> Tuple[Dict[str, Any], Optional[Path]]:
    if isinstance(source, dict):
        return source, None
    path = Path(source)
    if not path.exists():
        candidate = corpus_dir() / kind / path.name
        if candidate.exists():
            path = candidate
        else:
            raise CorpusFormatError(f"Không tìm thấy file {kind}: {source}")
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f), path
    except json.JSONDecodeError as e:
        raise CorpusFormatError(f"File {path} không phải JSON hợp lệ: {e}") from e


def _require(data: Dict[str, Any], key: str, where: str):
    if key not in data:
        raise CorpusFormatError(f"{where}: thiếu khóa '{key}'.")
    return data[key]


def _resolve_pairs(names: List[str], pairs, where: str) -> List[Tuple[int, int]]:
    index = {name: i for i, name in enumerate(names)}
    resolved = []
    for pair in pairs:
        if len(pair) != 2:
            raise CorpusFormatError(f"{where}: cặp thứ tự không hợp lệ {pair}.")
        try:
            resolved.append(tuple(p if isinstance(p, int) else index[p] for p in pair))
        except KeyError as e:
            raise CorpusFormatError(f"{where}: phần tử không xác định {e}.") from e
    return resolved


def load_lattice(source: Source) -> SupLattice:
    """{"elements": [tên], "leq": [[x, y], ...]}; bảng join/meet luôn được tính lại."""
    data, path = _read(source, 'lattices')
    where = str(path or 'lattice')
    names = _require(data, 'elements', where)
    pairs = _resolve_pairs(names, _require(data, 'leq', where), where)
    return SupLattice.from_leq(len(names), pairs, names=names, close=True)


def load_quantale(source: Source) -> FiniteQuantale:
    """
    {"name", "lattice": <dàn hoặc tên file>, "product": [[...]], "unit": chỉ số|null, "star": [...]|null}
    hoặc {"name", "endo_of": <dàn>} cho Q(S).
    """
    data, path = _read(source, 'quantales')
    where = str(path or 'quantale')
    name = data.get('name') or (path.stem if path else None)
    if 'endo_of' in data:
        q = endo_quantale(load_lattice(data['endo_of']))
        q.name = name or q.name
        return q
    lattice = load_lattice(_require(data, 'lattice', where))
    product = np.array(_require(data, 'product', where), dtype=np.int64)
    if product.shape != (lattice.size, lattice.size):
        raise CorpusFormatError(f"{where}: bảng tích {product.shape} không khớp {lattice.size} phần tử.")
    unit = data.get('unit')
    star = data.get('star')
    if star is not None and len(star) != lattice.size:
        raise CorpusFormatError(f"{where}: star có {len(star)} phần tử, cần {lattice.size}.")
    return FiniteQuantale(lattice, product, unit=unit, star=star, name=name)


def load_point(source: Source, q: FiniteQuantale) -> QuantaleHom:
    """
    Điểm của q cho dưới dạng {"name", "target": <quantale>, "map": [...]}.
    map[a] là ảnh của phần tử thứ a của q, ghi bằng chỉ số hoặc tên phần tử đích.
    Tính đồng cấu được kiểm tra ở spatialize, không ở đây.
    """
    data, path = _read(source, 'points')
    where = str(path or 'point')
    target = load_quantale(_require(data, 'target', where))
    images = _require(data, 'map', where)
    if len(images) != q.size:
        raise CorpusFormatError(f"{where}: map có {len(images)} phần tử, '{q.name}' có {q.size}.")
    index = {name: i for i, name in enumerate(target.names)}
    try:
        mapping = tuple(x if isinstance(x, int) else index[x] for x in images)
    except KeyError as e:
        raise CorpusFormatError(f"{where}: phần tử đích không xác định {e}.") from e
    logger.debug(f"Nạp điểm {data.get('name', where)}: {q.name} -> {target.name}.")
    return QuantaleHom(q, target, mapping)


def load_poset(source: Source) -> FiniteFrame:
    """{"points": [tên], "leq": [[x, y], ...]} -> frame các tập dưới."""
    data, path = _read(source, 'posets')
    where = str(path or 'poset')
    points = _require(data, 'points', where)
    n = len(points)
    leq = np.zeros((n, n), dtype=bool)
    for x, y in _resolve_pairs(points, _require(data, 'leq', where), where):
        leq[x, y] = True
    name = data.get('name') or (path.stem if path else None)
    return FiniteFrame(points, transitive_closure(leq), name=name)


def load_subspace(source: Source, algebra: Algebra) -> Subspace:
    """Danh sách phần tử sinh, mỗi phần tử là danh sách ma trận theo khối với hệ số dạng chuỗi."""
    if isinstance(source, (list, tuple)):
        data = source
    else:
        data, _ = _read(source, 'subspaces')
        if isinstance(data, dict):
            declared = data.get('algebra')
            if declared is not None and Algebra.parse(declared) != algebra:
                raise CorpusFormatError(f"{source}: không gian con thuộc {declared}, không thuộc {algebra}.")
            data = _require(data, 'spanners', str(source))
    try:
        return span(algebra, [algebra.from_blocks(element) for element in data])
    except (ValueError, TypeError) as e:
        raise CorpusFormatError(f"Không gian con không hợp lệ cho {algebra}: {e}") from e


def _load_all(kind: str, loader) -> List:
    items = []
    for path in sorted((corpus_dir() / kind).glob('*.json')):
        try:
            items.append(loader(path))
        except QuantaleLabError as e:
            logger.error(f"File corpus lỗi {path.name}: {e}")
            raise
    return items


def corpus_quantales() -> List[FiniteQuantale]:
    return _load_all('quantales', load_quantale)


def corpus_frames() -> List[FiniteFrame]:
    return _load_all('posets', load_poset)


def corpus_lattices() -> List[SupLattice]:
    return _load_all('lattices', load_lattice)


def scenario_metadata() -> Dict[str, Dict[str, Any]]:
    path = corpus_dir() / 'scenarios.json'
    data, _ = _read(path, '')
    return {entry['name']: entry for entry in _require(data, 'scenarios', str(path))}
