# chaos package
