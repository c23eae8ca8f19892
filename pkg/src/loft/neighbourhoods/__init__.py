from .templates import NeighbourhoodStructure, chains_for, instantiate_structures
from .apply import ABANDONED, Move, apply_structure, revert

__all__ = ['NeighbourhoodStructure', 'chains_for', 'instantiate_structures',
           'ABANDONED', 'Move', 'apply_structure', 'revert']
