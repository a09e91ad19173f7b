# lbm package
