"""
Per-algorithm summaries of benchmark cells.

Means use math.fsum so they are recomputable from the cells to the last bit.
"""

import math


def describe(values) -> dict:
    """Mean (fsum) and sample standard deviation of a list of floats."""
    values = [float(v) for v in values]
    n = len(values)
    if n == 0:
        return {'mean': None, 'std': None, 'n': 0}
    mean = math.fsum(values) / n
    std = math.sqrt(math.fsum((v - mean) ** 2 for v in values) / (n - 1)) if n > 1 else 0.0
    return {'mean': mean, 'std': std, 'n': n}


def _cell_values(cells, label, extract):
    values = []
    for cell in cells:
        if cell['algorithm'] != label or not cell['success']:
            continue
        value = extract(cell)
        if value is not None:
            values.append(value)
    return values


def nd_percent(dipolarity_record: dict, threshold: float) -> float:
    """ND% of one cell at any threshold, recomputed from its residual variances."""
    rv = dipolarity_record['rv']
    if not rv:
        return 0.0
    return 100.0 * sum(1 for v in rv if v is not None and v < threshold) / len(rv)


def summarize(cells, labels, thresholds) -> dict:
    """Per-algorithm mean/std over datasets of every metric present in the cells."""
    summary = {}
    for label in labels:
        own = [cell for cell in cells if cell['algorithm'] == label]
        entry = {
            'n_datasets': sum(1 for cell in own if cell['success']),
            'n_failed': sum(1 for cell in own if not cell['success']),
        }
        extractors = {
            'mir_bits_per_sample': lambda c: c.get('mir', {}).get('mir_bits_per_sample'),
            'mir_kbits_per_sec': lambda c: c.get('mir', {}).get('mir_kbits_per_sec'),
            'remnant_pmi_percent': lambda c: c.get('remnant_pmi', {}).get('percent'),
            'amari_index': lambda c: c.get('amari_index'),
        }
        for name, extract in extractors.items():
            values = _cell_values(cells, label, extract)
            if values:
                entry[name] = describe(values)
        if any('dipolarity' in cell for cell in own if cell['success']):
            entry['nd_percent'] = [
                {'threshold': t, **describe(_cell_values(
                    cells, label, lambda c, t=t: nd_percent(c['dipolarity'], t) if 'dipolarity' in c else None))}
                for t in thresholds
            ]
        summary[label] = entry
    return summary


def algorithm_ordering(cells, labels, datasets) -> dict:
    """
    Per-dataset algorithm order by descending MIR and whether it is the same
    on every dataset (over algorithms that succeeded everywhere).
    """
    per_dataset = {}
    for dataset in datasets:
        scored = [(cell['mir']['mir_bits_per_sample'], labels.index(cell['algorithm']), cell['algorithm'])
                  for cell in cells
                  if cell['dataset'] == dataset and cell['success'] and 'mir' in cell]
        scored.sort(key=lambda item: (-item[0], item[1]))
        per_dataset[dataset] = [label for _, _, label in scored]

    complete = [label for label in labels if all(label in order for order in per_dataset.values())]
    reduced = [[label for label in order if label in complete] for order in per_dataset.values()]
    preserved = all(order == reduced[0] for order in reduced) if reduced else True
    return {'by_dataset': per_dataset, 'compared_algorithms': complete, 'order_preserved': preserved}

