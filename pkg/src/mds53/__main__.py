from mds53.cli import main

main()
