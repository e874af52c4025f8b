import sys

import click

from .app import create_app
from .config import ModelConfig
from .models import ModelsUnavailable, load_models


@click.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=9000, show_default=True, type=int)
@click.option("--config", "config_path", default=None, type=click.Path(exists=True),
              help="JSON file with detector/segmenter checkpoints and device.")
def main(host, port, config_path):
    """Serve the wire protocol over real detector/segmenter checkpoints."""
    import uvicorn

    config = ModelConfig.from_file(config_path) if config_path else ModelConfig()
    try:
        models = load_models(config)  # refuse to start without checkpoints
    except ModelsUnavailable as exc:
        click.echo(f"refusing to start: {exc}", err=True)
        sys.exit(1)
    app = create_app(config, models=models)
    uvicorn.run(app, host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
