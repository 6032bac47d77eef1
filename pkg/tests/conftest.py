import numpy as np
import pytest

from daesemi import Pencil


@pytest.fixture
def diag_pencil() -> Pencil:
    return Pencil(np.eye(2), np.diag([-1.0, -2.0]), omega_hint=-1.0,
                  name="diag")


@pytest.fixture
def nilpotent_pencil() -> Pencil:
    E = np.array([[0.0, 1.0], [0.0, 0.0]])
    return Pencil(E, np.eye(2), name="nilpotent2")


def nilpotent_of_index(k: int) -> Pencil:
    E = np.diag(np.ones(k - 1), 1) if k > 1 else np.zeros((1, 1))
    return Pencil(E, np.eye(max(k, 1)), name=f"nilpotent{k}")
