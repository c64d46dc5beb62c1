import os
from dotenv import load_dotenv

load_dotenv()

MAX_ROUNDS = int(os.getenv("ARCHRECON_MAX_ROUNDS", "1000"))
MAX_ENTITIES = int(os.getenv("ARCHRECON_MAX_ENTITIES", "100000"))
LOG_LEVEL = os.getenv("ARCHRECON_LOG_LEVEL", "INFO")
PIPELINE_WORKERS = int(os.getenv("ARCHRECON_PIPELINE_WORKERS", "4"))

EXTRACTOR_FILE_SUFFIXES = (".extractor.json", ".extractor.yaml", ".extractor.yml")
