from unidecode import unidecode

def normalize(text: str) -> str:
    return unidecode(text).lower().strip()

LOG_FILE = "feynsum.log"
SCHEMA_VERSION = 1
TOOL_VERSION = "0.1.0"

DEFAULT_CONFIG = {
    "d": 3,
    "window_words": 4,
    "window_gamma": 2,
    "seed": 0,
    "stable_graphs": False,
    "defect_mode": "redistribute",
    "jobs": 1,
    "record_timings": False,
}

CAMPAIGNS = [
    "gt-bijection",
    "bd-axioms",
    "linfty",
    "bvinf",
    "key-lemma",
    "commutation",
]
