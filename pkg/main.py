"""
ccmnet - command-line entry point
"""
import logging
import sys

from dotenv import load_dotenv

# Load environment variables (CCM_OUTPUT_DIR) before settings are read
load_dotenv()

from cli import main  # noqa: E402

# Configure logging (the CLI may lower or raise the level with --log-level)
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)

if __name__ == "__main__":
    sys.exit(main())
