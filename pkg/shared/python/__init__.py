# Marker file for shared.python package
