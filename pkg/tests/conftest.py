import os
import sys
from itertools import combinations

import pytest

ROOT = os.path.join(os.path.dirname(__file__), '..')
sys.path.insert(0, os.path.join(ROOT, 'src'))
sys.path.insert(0, ROOT)


def brute_force_b2_count(masks):
    """Each B_2 has exactly one incomparable pair, whose meet and join are the other two members"""
    present = set(masks)
    count = 0
    for x, y in combinations(masks, 2):
        if x & ~y and y & ~x and (x & y) in present and (x | y) in present:
            count += 1
    return count


def brute_force_union_free(masks, a):
    for target in range(len(masks)):
        others = [i for i in range(len(masks)) if i != target]
        for combo in combinations(others, a):
            union = 0
            for i in combo:
                union |= masks[i]
            if union == masks[target]:
                return False
    return True


@pytest.fixture
def family_file(tmp_path):
    def write(text, name="family.txt"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return write
