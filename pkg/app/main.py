import sys

from cli_application import CLIApplication

if __name__ == "__main__":
    # --debug is parsed again by the application; checked here so that loading is logged too.
    cli_app = CLIApplication(development_mode="--debug" in sys.argv[1:])
    sys.exit(cli_app.run(sys.argv[1:]))
