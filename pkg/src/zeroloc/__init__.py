"""Zero-energy localized states of a 2D particle in a complex potential."""
