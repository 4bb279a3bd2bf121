# Commands package
from .action import geodesic, omega
from .conditions import check
from .pde import solve_command
from .verify import nested, sharpness, verify

__all__ = ['omega', 'geodesic', 'solve_command', 'check', 'verify', 'sharpness', 'nested']
