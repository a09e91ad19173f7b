# field package
