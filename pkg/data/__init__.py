from .data_loader import DataLoader, Workbench, load_workbench
from .quiver_reader import ParseError, UnknownNameError

__all__ = ['DataLoader', 'ParseError', 'UnknownNameError', 'Workbench', 'load_workbench']
