# spectral package
