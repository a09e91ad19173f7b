# worker package
