import sys
from src.SubRiem.cli import main


if __name__ == "__main__":
    sys.exit(main())
