"""Yang-Baxter deformed Fock spaces: symmetrizers, creators, shift ergodicity."""
