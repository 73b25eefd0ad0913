from iesym.labctl.cli import main

main()
