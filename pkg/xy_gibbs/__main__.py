from xy_gibbs.cli import main

main()
