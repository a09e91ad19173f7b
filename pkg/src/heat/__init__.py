# heat package
