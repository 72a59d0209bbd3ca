import sys
from pathlib import Path

# Let `pytest` run from a fresh checkout without an editable install.
sys.path.insert(0, str(Path(__file__).parent / "src"))
