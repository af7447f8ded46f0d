"""Best-known objective values for the public 2E-LRP benchmark sets."""

import re
from typing import Dict, Optional

PRODHON_BKS: Dict[str, int] = {
    "20-5-1": 89075, "20-5-1b": 61863, "20-5-2": 84478, "20-5-2b": 60838,
    "50-5-1": 130843, "50-5-1b": 101530, "50-5-2": 131825, "50-5-2b": 110332,
    "50-5-2BIS": 122599, "50-5-2bBIS": 105696, "50-5-3": 128379, "50-5-3b": 104006,
    "100-5-1": 318134, "100-5-1b": 256878, "100-5-2": 231305, "100-5-2b": 194728,
    "100-5-3": 244071, "100-5-3b": 194110, "100-10-1": 351243, "100-10-1b": 297167,
    "100-10-2": 304438, "100-10-2b": 263873, "100-10-3": 310148, "100-10-3b": 260328,
    "200-10-1": 548703, "200-10-1b": 445301, "200-10-2": 497451, "200-10-2b": 422668,
    "200-10-3": 527162, "200-10-3b": 401672,
}

NGUYEN_BKS: Dict[str, int] = {
    "25-5N": 80370, "25-5Nb": 64562, "25-5MN": 78947, "25-5MNb": 64438,
    "50-5N": 137815, "50-5Nb": 110094, "50-5MN": 123484, "50-5MNb": 105401,
    "50-10N": 115725, "50-10Nb": 87315, "50-10MN": 135519, "50-10MNb": 110613,
    "100-5N": 193228, "100-5Nb": 158927, "100-5MN": 204682, "100-5MNb": 165744,
    "100-10N": 209952, "100-10Nb": 155489, "100-10MN": 201275, "100-10MNb": 170625,
    "200-10N": 343232, "200-10Nb": 256171, "200-10MN": 323801, "200-10MNb": 287076,
}

_ALL = {**PRODHON_BKS, **NGUYEN_BKS}
_FOLDED = {k.lower(): v for k, v in _ALL.items()}


def lookup_bks(name: str) -> Optional[int]:
    """BKS for an instance name; case-insensitive, tolerant of common prefixes."""
    key = re.sub(r"^(coord|prodhon[-_]?|nguyen[-_]?)", "", name.strip(), flags=re.IGNORECASE)
    return _FOLDED.get(key.lower())
