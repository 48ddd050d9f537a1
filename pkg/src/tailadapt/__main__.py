from tailadapt.cli import entry_point

entry_point()
