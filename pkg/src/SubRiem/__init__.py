from .subriem import SubRiem

__all__ = ["SubRiem"]
