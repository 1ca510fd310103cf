import os

from dotenv import load_dotenv

from commands import CONFIG_MAPPING, cli
from gl3lab import create_lab

# Load environment variables
load_dotenv()

# Get configuration from environment
config_name = os.environ.get('GL3LAB_ENV', 'development')

lab = create_lab(CONFIG_MAPPING.get(config_name, 'config.DevelopmentConfig'))

if __name__ == '__main__':
    cli()
